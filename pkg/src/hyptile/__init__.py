__version__ = "0.1.0"
from hyptile.config import set_threads, get_threads, set_max_tiles, get_max_tiles
from hyptile.core.hyperbolic import HPoint, Hyperplane, LorentzIsometry
from hyptile.core.tiling import build_template, enumerate_tiling
from hyptile import fields, io, parallel, render

import sys
from hyptile.cli import main

sys.exit(main())

import sys

from uhardy.cli import main

sys.exit(main())

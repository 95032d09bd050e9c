import sys

from morasskit.cli import main

sys.exit(main())

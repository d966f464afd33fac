import sys

from looproot.cli import main

sys.exit(main())

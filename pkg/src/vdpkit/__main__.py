import sys

from vdpkit.cli import main

sys.exit(main())

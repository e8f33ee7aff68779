import sys

from ptrie.cli import main

sys.exit(main())

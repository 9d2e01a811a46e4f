import sys

from smtquery.cli import main

sys.exit(main())

import sys

from relaxmatch.main import main

sys.exit(main())

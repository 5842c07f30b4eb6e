"""Run the topo-ramsey command line with python -m topo_ramsey."""

from .cli import main

raise SystemExit(main())

from construct.cli import main

raise SystemExit(main())

from tancat.cli import main

raise SystemExit(main())

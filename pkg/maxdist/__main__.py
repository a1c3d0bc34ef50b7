from maxdist.cli.main import main

main()

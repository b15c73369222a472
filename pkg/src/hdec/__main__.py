from hdec.cli import main

main()

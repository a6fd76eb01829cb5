from wavenoise.main import main

main()

from qturan.main import main

main()

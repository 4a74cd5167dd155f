import pkg.util

pkg.util.helper()

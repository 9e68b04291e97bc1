name = "LPLab"
version = "0.1.0"
banner = "%s %s" % (name, version)

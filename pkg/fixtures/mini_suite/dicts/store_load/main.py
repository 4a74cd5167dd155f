def handler():
    pass


registry = {}
registry["go"] = handler
registry["go"]()

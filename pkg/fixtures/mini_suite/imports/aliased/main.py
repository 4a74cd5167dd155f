import tools as t

t.probe()

from ..pkg import f as g

g()

from .sibling import VALUE as v

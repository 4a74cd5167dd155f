from helpers import *

alpha()

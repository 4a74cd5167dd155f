import os

from os import path

os.getcwd()

from .. import i01_plain

import sys

from . import HERE, write_all

for p in write_all(sys.argv[1] if len(sys.argv) > 1 else HERE):
    print(p)

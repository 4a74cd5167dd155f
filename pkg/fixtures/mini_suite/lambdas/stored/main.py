def mul(x):
    return x


double = lambda v: mul(v)
result = double(2)

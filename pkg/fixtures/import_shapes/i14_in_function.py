def lazy():
    import os
    return os

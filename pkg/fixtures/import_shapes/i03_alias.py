import os as operating_system

import sys
import os
import logging

# 1. Setup Path
sys.path.append(os.getcwd())

from core.config import settings

# 2. Logging ไป stderr เท่านั้น (stdout = report)
logging.basicConfig(
    stream=sys.stderr,
    level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(levelname)s - [Orbifold] %(message)s'
)

from cli.app import app

if __name__ == "__main__":
    # python run_orbifold.py compare rsw29 --gamma Z --cutoff-degree 6
    app()

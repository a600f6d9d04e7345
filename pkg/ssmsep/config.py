import logging
import os

from dotenv import load_dotenv

load_dotenv()

# Only the log destination is read from the environment; experiment settings
# always come from the JSON config.
LOG_FILE = os.getenv('SSMSEP_LOG_FILE', 'ssmsep.log')
LOG_LEVEL = os.getenv('SSMSEP_LOG_LEVEL', 'INFO').upper()

logger = logging.getLogger('ssmsep')

logging.basicConfig(
    filename=LOG_FILE,
    level=LOG_LEVEL,
    filemode='w',
    format='%(asctime)s %(levelname)s %(name)s: %(message)s',
)

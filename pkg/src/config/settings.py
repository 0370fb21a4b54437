from dotenv import load_dotenv
import os

load_dotenv()


class Settings:
    def __init__(self):
        load_dotenv()
        self.data_dir = os.getenv("DOLFIN_DATA_DIR")
        self.glove_path = os.getenv("DOLFIN_GLOVE_PATH")
        self.checkpoint_dir = os.getenv("DOLFIN_CHECKPOINT_DIR", "checkpoints")
        self.report_dir = os.getenv("DOLFIN_REPORT_DIR", "reports")

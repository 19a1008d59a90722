from pathlib import Path
from typing import Union

from src.core.logging.logger_factory import get_logger


class BaseRepository:
    """
    Base repository for run artifacts stored under one output directory.

    Subclasses write through `_open`, which creates parent directories,
    logs every write and re-raises I/O failures after logging them.
    """

    def __init__(self, root: Union[str, Path]):
        """
        Initialize the repository with its output directory.

        Args:
            root: Directory that receives all artifacts; created on demand
        """
        self.root = Path(root)
        self.logger = get_logger(f"{__name__}.{self.__class__.__name__}")

    def path_for(self, name: str) -> Path:
        """Absolute location of an artifact name relative to the root."""
        return self.root / name

    def _open(self, name: str):
        path = self.path_for(name)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            return path.open("w", encoding="utf-8", newline="")
        except OSError as e:
            self.logger.error(f"Error opening artifact {path}: {e}")
            raise

    def exists(self, name: str) -> bool:
        exists = self.path_for(name).is_file()
        self.logger.debug(f"Artifact {name} exists: {exists}")
        return exists

from abc import ABC, abstractmethod
from typing import Any, Dict


class IdentityCheck(ABC):
    identity_id: str = ""
    description: str = ""

    @abstractmethod
    def run(self, params: Dict[str, Any], settings):
        raise NotImplementedError

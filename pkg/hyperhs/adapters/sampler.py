from abc import ABC, abstractmethod

import numpy as np


class MatrixSampler(ABC):
    @abstractmethod
    def draw(self, rng: np.random.Generator, size: int):
        raise NotImplementedError

import hashlib
from typing import Dict, Iterable, List, Sequence

import numpy as np

PAD = "<pad>"
UNK = "<unk>"
PAD_INDEX = 0
UNK_INDEX = 1


class Vocab:
    """Word index with 0 reserved for padding and 1 for unknown words; order is insertion order."""

    def __init__(self, words: Iterable[str] = ()):
        self._words: List[str] = [PAD, UNK]
        self._index: Dict[str, int] = {PAD: PAD_INDEX, UNK: UNK_INDEX}
        for word in words:
            self.add(word)

    @classmethod
    def build(cls, texts: Iterable[Sequence[str]]) -> "Vocab":
        vocab = cls()
        for tokens in texts:
            for token in tokens:
                vocab.add(token)
        return vocab

    def add(self, word: str) -> int:
        index = self._index.get(word)
        if index is None:
            index = len(self._words)
            self._index[word] = index
            self._words.append(word)
        return index

    def __len__(self) -> int:
        return len(self._words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __iter__(self):
        return iter(self._words)

    def index(self, word: str) -> int:
        return self._index.get(word, UNK_INDEX)

    def word(self, index: int) -> str:
        return self._words[index]

    def encode(self, tokens: Sequence[str]) -> np.ndarray:
        return np.array([self.index(t) for t in tokens], dtype=np.int64)

    def decode(self, ids: Iterable[int]) -> List[str]:
        return [self._words[int(i)] for i in ids if int(i) != PAD_INDEX]

    @property
    def words(self) -> List[str]:
        return list(self._words)

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for word in self._words:
            digest.update(word.encode("utf-8"))
            digest.update(b"\n")
        return digest.hexdigest()

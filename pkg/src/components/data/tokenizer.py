"""
Rule-based word tokenizer.

Rules, applied left to right by a single regular expression:
  1. negation clitics split off the stem: "wasn't" -> "was", "n't"
  2. the clitics 's 're 've 'll 'd 'm become their own token: "they're" -> "they", "'re"
  3. decimal numbers and thousands stay whole: "3.5", "1,000"
  4. each of . , ! ? ; : " ' ( ) ` is a token on its own
  5. any other run of non-space characters is a token
Case is preserved.
"""
import re
from typing import List

PUNCTUATION = ".,!?;:\"'()`"

_TOKEN_RE = re.compile(
    r"""
    \w+(?=n't\b)
  | n't\b
  | '(?i:s|re|ve|ll|d|m)\b
  | \d+(?:[.,]\d+)+
  | [^\s.,!?;:"'()`]+
  | [.,!?;:"'()`]
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> List[str]:
    return _TOKEN_RE.findall(text)

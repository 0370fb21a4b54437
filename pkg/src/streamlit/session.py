from dataclasses import dataclass, field
from typing import List, Dict, Any, Optional

@dataclass
class SessionState:
    reports: List[Dict[str, Any]] = field(default_factory=list)
    loaded: Optional[Dict[str, Any]] = None
    show_predefined: bool = True

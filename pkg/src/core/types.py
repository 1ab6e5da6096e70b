from dataclasses import asdict, dataclass
from typing import Dict, List


@dataclass(frozen=True)
class Violation:
    """不变量违例记录：字段路径、规则名、期望与实际，便于机器读取。"""

    path: str
    rule: str
    expected: str
    actual: str

    def to_dict(self) -> Dict[str, str]:
        """转换为字典，便于序列化。"""
        return asdict(self)


def violations_to_list(violations: List[Violation]) -> List[Dict[str, str]]:
    return [item.to_dict() for item in violations]

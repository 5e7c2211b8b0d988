from enum import Enum


class FamilyOption(str, Enum):
    TGAMMA = "tgamma"
    TPRIME = "tprime"

"""Published coverage tables and Likert cells for the three reference methods.

Objective rows: (coverage, weighted coverage, label).  Principle rows:
(coverage, label).  Labels are transcribed as printed, including the cells
that disagree with the banding rule; those are listed in ``ERRATA_CELLS``.
"""

S, VW, SU = "Strongly", "VeryWell", "Sufficiently"

FDD_OBJECTIVES = {
    "human-centric": ("3/4", "4/6", VW),
    "value-driven": ("5/6", "7/8", S),
    "maximal-adaptability": ("3/5", "3/6", SU),
    "continuous-innovation-and-learning": ("2/2", "3/3", S),
}
FDD_PRINCIPLES = {
    "frequent-delivery": ("8/8", S),
    "technical-excellence": ("12/18", VW),
    "empowered-teams": ("4/5", VW),
    "constant-development-pace": ("7/10", VW),
    "frequent-reflection": ("6/9", VW),
    "customer-satisfaction": ("3/5", SU),
}

XP_OBJECTIVES = {
    "human-centric": ("4/4", "6/6", S),
    "value-driven": ("6/6", "8/8", S),
    "minimal-waste": ("4/4", "5/5", S),
    "maximal-adaptability": ("5/5", "6/6", S),
    "continuous-innovation-and-learning": ("2/2", "3/3", S),
}
XP_PRINCIPLES = {
    "frequent-delivery": ("8/8", S),
    "technical-excellence": ("15/18", VW),
    "simplicity": ("6/6", S),
    "empowered-teams": ("4/5", VW),
    "constant-development-pace": ("10/10", S),
    "accommodating-change": ("11/11", S),
    "continual-stakeholder-communication": ("6/7", VW),
    "frequent-reflection": ("8/9", VW),
    "customer-satisfaction": ("5/5", S),
}

METHOD_A_OBJECTIVES = {
    "human-centric": ("4/4", "6/6", S),
    "value-driven": ("5/6", "7/8", S),
    "minimal-waste": ("4/4", "5/5", S),
    "maximal-adaptability": ("4/5", "5/6", S),
}
METHOD_A_PRINCIPLES = {
    "frequent-delivery": ("8/8", S),
    "technical-excellence": ("15/18", VW),
    "simplicity": ("5/6", VW),
    "empowered-teams": ("4/5", VW),
    "constant-development-pace": ("10/10", VW),
    "accommodating-change": ("11/11", VW),
    "continual-stakeholder-communication": ("6/7", VW),
    "customer-satisfaction": ("4/5", VW),
}

PUBLISHED = {
    "fdd": (FDD_OBJECTIVES, FDD_PRINCIPLES),
    "xp": (XP_OBJECTIVES, XP_PRINCIPLES),
    "method-a": (METHOD_A_OBJECTIVES, METHOD_A_PRINCIPLES),
}

# (method, element) cells whose printed label contradicts the band rule
ERRATA_CELLS = {
    "xp": {"technical-excellence", "continual-stakeholder-communication", "frequent-reflection"},
    "method-a": {
        "technical-excellence",
        "simplicity",
        "constant-development-pace",
        "accommodating-change",
        "continual-stakeholder-communication",
    },
    "fdd": set(),
}

# per-principle expected linkage counts and per-objective weighted denominators
PRINCIPLE_EXPECTED = {
    "frequent-delivery": 8,
    "technical-excellence": 18,
    "simplicity": 6,
    "empowered-teams": 5,
    "constant-development-pace": 10,
    "accommodating-change": 11,
    "continual-stakeholder-communication": 7,
    "frequent-reflection": 9,
    "customer-satisfaction": 5,
}
OBJECTIVE_EXPECTED = {
    "human-centric": (4, 6),
    "value-driven": (6, 8),
    "minimal-waste": (4, 5),
    "maximal-adaptability": (5, 6),
    "continuous-innovation-and-learning": (2, 3),
}

# objective -> principle linkages, unweighted, as a 0/1 matrix
OBJECTIVE_PRINCIPLE_MATRIX = {
    "human-centric": {"technical-excellence", "empowered-teams", "constant-development-pace",
                      "continual-stakeholder-communication"},
    "value-driven": {"frequent-delivery", "technical-excellence", "simplicity", "accommodating-change",
                     "frequent-reflection", "customer-satisfaction"},
    "minimal-waste": {"technical-excellence", "simplicity", "continual-stakeholder-communication",
                      "frequent-reflection"},
    "maximal-adaptability": {"frequent-delivery", "technical-excellence", "simplicity", "accommodating-change",
                             "frequent-reflection"},
    "continuous-innovation-and-learning": {"technical-excellence", "frequent-reflection"},
}

_SHORT = {
    "FD": "frequent-delivery", "TE": "technical-excellence", "S": "simplicity", "ET": "empowered-teams",
    "CP": "constant-development-pace", "AC": "accommodating-change",
    "CC": "continual-stakeholder-communication", "FR": "frequent-reflection", "CS": "customer-satisfaction",
}
_PRACTICE_ROWS = """
iterative-incremental-development FD CP AC FR
evolutionary-requirements FD S CP AC CC FR
refactoring TE S
test-driven-development TE S CP
automated-test-builds TE FR
pair-programming TE ET CP
minimal-bruf-bduf S AC
just-in-time TE S AC
self-organizing-teams TE ET
agile-working-environment TE CC
continuous-delivery FD CP AC CS
constant-velocity FD TE CP
collocated-customers TE AC CC FR CS
continuous-feedback FD TE CP AC CC FR CS
prioritization FD TE CP
daily-progress-meetings TE AC CC FR
agile-documentation TE S CS
agile-estimation FD CP
face-to-face-communication TE ET AC CC FR
retrospective-meetings AC FR
client-driven-iterations CC CS
small-frequent-releases FD CP AC
expertise-composition TE ET
configuration-management TE
code-ownership ET
iteration-progress-tracking TE FR
coding-standards TE
"""
# practice -> principles it reflects
PRACTICE_PRINCIPLES = {
    row.split()[0]: {_SHORT[c] for c in row.split()[1:]} for row in _PRACTICE_ROWS.strip().splitlines()
}

import json
import sys

target = sys.argv[1] if len(sys.argv) > 1 else "aspirin"
route = {
    "target": target,
    "steps": [
        {"order": 1, "reaction": "esterification", "precursors": ["salicylic acid", "acetic anhydride"]},
        {"order": 2, "reaction": "carboxylation", "precursors": ["phenol", "co2"]},
        {"order": 3, "reaction": "hydroxylation", "precursors": ["benzene"]},
    ],
}
print(json.dumps(route, indent=2, sort_keys=True))

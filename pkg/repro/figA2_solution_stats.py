"""Ground-state multiplicity and pairwise distances from exact enumeration."""
from _common import gen_and_brute, parser, show

args = parser("figA2", 1000, [8, 10, 12, 14, 16]).parse_args()
gen_and_brute(args)
show(args, "solution_stats.csv")

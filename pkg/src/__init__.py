"""
Regal Rules Toolkit - Source Package
====================================

Existential rules, their oblivious chase and UCQ rewriting, the rule-set
surgeries producing regal rule sets, and the tournament / valley-query
analysis built on top of them.

Subpackages:
- scanners: parsing and serialization
- ruleEngine: chase and rewriting
- surgery: rule-set transformations and property checks
- analysis: multisets, tournaments, valley witnesses
"""

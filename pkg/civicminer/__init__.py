"""Association-rule mining of civic-tech questionnaire answers.

Rules relate regional issues to the information technologies respondents
would apply to them, and are ranked by conservative confidence measures that
discount rules seen in only a handful of answers.
"""

__version__ = "1.0.0"

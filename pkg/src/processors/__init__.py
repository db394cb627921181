# Instance parsers

"""Small helpers shared by the commands and the numerical modules."""

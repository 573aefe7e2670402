"""Full-size acceptance runs of the bundled scenarios."""

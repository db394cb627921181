"""Cache module for exact oracle results."""
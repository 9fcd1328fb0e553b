// Doctest glue for the book chapters; filled in once the book exists.

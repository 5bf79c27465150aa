"""Transfer ideals in Morava E-theory of finite abelian p-groups and their loop spaces."""

__version__ = "0.1.0"

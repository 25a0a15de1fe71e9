"""amakey: keyserver protocol with client-verifiable key distribution.

Identity cards bind one contact address to a public key and a media
attestment; community ratings over those attestments drive an automatic
trust rule; clients re-verify everything the keyserver returns, so the
server cannot substitute keys without being detected.
"""

__version__ = "0.1.0"

REGRESSOR_FORMAT_VERSION = 1
PROFILE_CACHE_VERSION = 1
MANIFEST_VERSION = 1

REGRESSOR_FORMAT_HEADER = f"# esltypo-regressors v{REGRESSOR_FORMAT_VERSION}"

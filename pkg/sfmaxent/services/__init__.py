"""Services package."""
from sfmaxent.services.run_service import RunService

__all__ = ['RunService']

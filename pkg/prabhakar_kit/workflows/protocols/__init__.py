"""Protocol files of the acceptance workflows."""

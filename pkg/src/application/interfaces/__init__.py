# Application interfaces

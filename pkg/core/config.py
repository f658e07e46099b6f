import os
from pydantic_settings import BaseSettings

# หา Path ของ Project Root ให้ชัวร์
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


class Settings(BaseSettings):
    # --- 🧮 Group enumeration ---
    GROUP_ORDER_CAP: int = 1_000_000
    HOM_BUDGET: int = 100_000_000

    # cross-check product_class_count against the full product only up to this order
    PRODUCT_CROSS_CHECK_LIMIT: int = 1000

    # --- 📐 Lattices ---
    VECTOR_BUDGET: int = 2_000_000
    THETA_CHECK_MU: str = "20"

    # --- 📈 Spectra ---
    DEFAULT_CUTOFF_DEGREE: int = 6
    DEFAULT_CUTOFF_MU: str = "20"

    # ค้นหา coordinate permutation เฉพาะมิติเล็กๆ (n! โตเร็วมาก)
    ISOMETRY_SEARCH_MAX_DIM: int = 8

    # --- 🧾 Reports ---
    REPORT_SCHEMA_VERSION: int = 1
    LOG_LEVEL: str = "INFO"

    # =========================================================
    # ⚙️ LOGIC PROPERTIES
    # =========================================================

    @property
    def DATA_DIR(self) -> str:
        """ที่เก็บ fixture ที่ ship มากับ repo (lattices, singular sets, strata)"""
        return os.path.join(BASE_DIR, "catalog", "data")

    @property
    def SCENARIO_DIR(self) -> str:
        """Scenario files (JSON) ที่ CLI หาเจอด้วยชื่อสั้น"""
        return os.path.join(self.DATA_DIR, "scenarios")

    # --- ⚙️ Pydantic Config ---
    class Config:
        env_file = os.path.join(BASE_DIR, ".env")
        env_file_encoding = 'utf-8'
        extra = "ignore"


settings = Settings()

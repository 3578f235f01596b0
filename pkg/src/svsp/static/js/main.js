import { ApiClient } from "./api.js";
import { Workbench } from "./app.js";
const workbench = new Workbench(document, new ApiClient(""));
workbench.init().catch((err) => {
    const banner = document.getElementById("banner");
    if (banner) {
        banner.textContent = String(err);
        banner.classList.remove("hidden");
    }
});

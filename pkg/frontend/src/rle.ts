/** Decoder for the frame payloads: RLE with #C metadata comments. */

export interface DecodedFrame {
  width: number; // pattern bounding-box width from the RLE header
  height: number;
  offsetX: number; // absolute grid position of the bounding box
  offsetY: number;
  generation: number;
  cells: Array<[number, number]>; // absolute grid coordinates
}

export function decodeRle(text: string): DecodedFrame {
  const meta: Record<string, string> = {};
  const bodyLines: string[] = [];
  let header = "";
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (line.startsWith("#")) {
      if (line.startsWith("#C") && line.includes("=")) {
        const rest = line.slice(2).trim();
        const eq = rest.indexOf("=");
        meta[rest.slice(0, eq)] = rest.slice(eq + 1);
      }
    } else if (line.startsWith("x")) {
      header = line;
    } else if (line.length > 0) {
      bodyLines.push(line);
    }
  }
  const hm = header.match(/x\s*=\s*(\d+)\s*,\s*y\s*=\s*(\d+)/);
  if (!hm) throw new Error(`bad RLE header: ${header || "(missing)"}`);
  const width = parseInt(hm[1], 10);
  const height = parseInt(hm[2], 10);

  let offsetX = 0;
  let offsetY = 0;
  if (meta.offset) {
    const [ox, oy] = meta.offset.split(",").map((s) => parseInt(s, 10));
    if (Number.isNaN(ox) || Number.isNaN(oy)) {
      throw new Error(`bad offset comment: ${meta.offset}`);
    }
    offsetX = ox;
    offsetY = oy;
  }
  const generation = meta.generation ? parseInt(meta.generation, 10) : 0;

  const cells: Array<[number, number]> = [];
  let x = 0;
  let y = 0;
  let run = "";
  outer: for (const ch of bodyLines.join("")) {
    if (ch >= "0" && ch <= "9") {
      run += ch;
      continue;
    }
    const n = run === "" ? 1 : parseInt(run, 10);
    run = "";
    switch (ch) {
      case "b":
        x += n;
        break;
      case "o":
        for (let i = 0; i < n; i++) cells.push([offsetX + x + i, offsetY + y]);
        x += n;
        break;
      case "$":
        y += n;
        x = 0;
        break;
      case "!":
        break outer;
      default:
        throw new Error(`bad RLE token: ${ch}`);
    }
  }
  for (const [cx, cy] of cells) {
    if (cx - offsetX >= width || cy - offsetY >= height) {
      throw new Error("RLE body exceeds its declared bounding box");
    }
  }
  return { width, height, offsetX, offsetY, generation, cells };
}

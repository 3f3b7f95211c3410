#include <stdio.h>
int process(int res, int y)
{
    while (y != 0) {
        int k = y;
        y = res % y;
        res = k;
    }
    return res;
}
int reduce(int res, int y)
{
    int m = process(res, y);
    return res / m * y;
}
int main(void)
{
    int res = 58;
    int y = 93;
    printf("%d %d\n", process(res, y), reduce(res, y));
    return 0;
}

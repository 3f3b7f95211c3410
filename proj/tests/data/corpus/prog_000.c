#include <stdio.h>
int measure(int sum)
{
    int count = 0;
    int m;
    for (m = 0; m < sum; m++) {
        count = count + m;
    }
    return count;
}
int main(void)
{
    int sum = 8;
    int m = measure(sum);
    printf("%d\n", m);
    return 0;
}
